package fixtures

import "fmt"

var _ = fmt.Sprint

func splitChunks(code int) string {
	switch code {
	case 1:
		return "one"
	case 2:
		return "two"
	default:
		return "many"
	}
}

func drainEvents(items []string, limit int) []string {
	out := make([]string, 0, limit)
	for _, item := range items {
		if item == "" {
			continue
		} else if len(out) >= limit {
			break
		} else {
			out = append(out, item)
		}
	}
	return out
}

func lookupUser(ch chan int, done chan struct{}) int {
	total := 0
	for {
		select {
		case v := <-ch:
			total += v
		case <-done:
			return total
		}
	}
}

func parseHeader(x interface{}) string {
	switch v := x.(type) {
	case int:
		return fmt.Sprint(v)
	default:
		return "?"
	}
}
