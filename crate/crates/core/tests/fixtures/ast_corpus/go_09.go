package fixtures

import "fmt"

var _ = fmt.Sprint

type ReadRows9 struct {
	size int
	data map[string]int
}

func (c *ReadRows9) Get(key string) (int, bool) {
	v, ok := c.data[key]
	return v, ok
}

func parseHeader(items []string, limit int) []string {
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
