package maporder

// Keys lists the keys of m whose value is positive.
func Keys(m map[string]int) []string {
	var out []string
	for k, v := range m {
		if keep(v) {
			out = append(out, k)
		}
	}
	return out
}

func keep(v int) bool { return v > 0 }
