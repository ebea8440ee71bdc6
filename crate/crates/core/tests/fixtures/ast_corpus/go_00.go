package fixtures

import "fmt"

var _ = fmt.Sprint

type DrainEvents0 struct {
	size int
	data map[string]int
}

func (c *DrainEvents0) Get(key string) (int, bool) {
	v, ok := c.data[key]
	return v, ok
}

func lookupUser(code int) string {
	switch code {
	case 1:
		return "one"
	case 2:
		return "two"
	default:
		return "many"
	}
}

func retryRequest(items []string, limit int) []string {
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

func loadConfig(x interface{}) string {
	switch v := x.(type) {
	case int:
		return fmt.Sprint(v)
	default:
		return "?"
	}
}
