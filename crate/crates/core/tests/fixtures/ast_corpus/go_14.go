package fixtures

import "fmt"

var _ = fmt.Sprint

func parseHeader(ch chan int, done chan struct{}) int {
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

func flushCache(x interface{}) string {
	switch v := x.(type) {
	case int:
		return fmt.Sprint(v)
	default:
		return "?"
	}
}

type ResolveAlias14 struct {
	size int
	data map[string]int
}

func (c *ResolveAlias14) Get(key string) (int, bool) {
	v, ok := c.data[key]
	return v, ok
}

func encodeName(items []string, limit int) []string {
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
