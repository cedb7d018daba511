package tables

import "testing"

func TestInline(t *testing.T) {
	shared := []int{1, 2, 3}
	t.Run("sum", func(t *testing.T) {
		total := 0
		for _, v := range shared {
			total += v
		}
		if total != 6 {
			t.Fatal(total)
		}
	})
	t.Run("len", func(t *testing.T) {
		if len(shared) != 3 {
			t.Fatal("len")
		}
	})
	t.Run("empty", func(t *testing.T) {
		var none []int
		if len(none) != 0 {
			t.Fatal("none")
		}
	})
}
