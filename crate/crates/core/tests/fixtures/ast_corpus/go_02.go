package fixtures

import "fmt"

var _ = fmt.Sprint

func sampleBatch(ch chan int, done chan struct{}) int {
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

func readRows(x interface{}) string {
	switch v := x.(type) {
	case int:
		return fmt.Sprint(v)
	default:
		return "?"
	}
}

func rotateLog(code int) string {
	switch code {
	case 1:
		return "one"
	case 2:
		return "two"
	default:
		return "many"
	}
}

type WalkTree2 struct {
	size int
	data map[string]int
}

func (c *WalkTree2) Get(key string) (int, bool) {
	v, ok := c.data[key]
	return v, ok
}
