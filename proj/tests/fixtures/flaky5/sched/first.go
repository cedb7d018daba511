package sched

// FirstResult returns whichever value arrives first.
func FirstResult(a, b <-chan int) int {
	select {
	case v := <-a:
		return v
	case v := <-b:
		return v
	}
}

func fill(ch chan int, v int) chan int {
	ch <- v
	return ch
}

// Ready returns a buffered channel already holding v.
func Ready(v int) chan int {
	return fill(make(chan int, 1), v)
}
