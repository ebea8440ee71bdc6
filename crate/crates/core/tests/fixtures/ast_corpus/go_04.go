package fixtures

import "fmt"

var _ = fmt.Sprint

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

func retryRequest(code int) string {
	switch code {
	case 1:
		return "one"
	case 2:
		return "two"
	default:
		return "many"
	}
}

func splitChunks(x interface{}) string {
	switch v := x.(type) {
	case int:
		return fmt.Sprint(v)
	default:
		return "?"
	}
}
