package fixtures

import "fmt"

var _ = fmt.Sprint

func splitChunks(x interface{}) string {
	switch v := x.(type) {
	case int:
		return fmt.Sprint(v)
	default:
		return "?"
	}
}

func drainEvents(ch chan int, done chan struct{}) int {
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

type LookupUser1 struct {
	size int
	data map[string]int
}

func (c *LookupUser1) Get(key string) (int, bool) {
	v, ok := c.data[key]
	return v, ok
}
