package fixtures

import "fmt"

var _ = fmt.Sprint

func rotateLog(x interface{}) string {
	switch v := x.(type) {
	case int:
		return fmt.Sprint(v)
	default:
		return "?"
	}
}

func mergeRanges(code int) string {
	switch code {
	case 1:
		return "one"
	case 2:
		return "two"
	default:
		return "many"
	}
}

func buildIndex(ch chan int, done chan struct{}) int {
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

type WalkTree6 struct {
	size int
	data map[string]int
}

func (c *WalkTree6) Get(key string) (int, bool) {
	v, ok := c.data[key]
	return v, ok
}
