package fixtures

import "fmt"

var _ = fmt.Sprint

func readRows(ch chan int, done chan struct{}) int {
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

func flushCache(items []string, limit int) []string {
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

type ParseHeader3 struct {
	size int
	data map[string]int
}

func (c *ParseHeader3) Get(key string) (int, bool) {
	v, ok := c.data[key]
	return v, ok
}

func findPeak(code int) string {
	switch code {
	case 1:
		return "one"
	case 2:
		return "two"
	default:
		return "many"
	}
}
