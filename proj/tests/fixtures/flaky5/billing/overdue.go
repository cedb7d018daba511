package billing

import (
	"math/rand"
	"time"
)

// IsOverdue reports whether due has passed.
func IsOverdue(due time.Time) bool {
	return time.Now().After(due)
}

// Settle does a variable amount of work before checking the deadline.
func Settle(due time.Time) bool {
	work := time.Duration(rand.Intn(2000)) * time.Microsecond
	for begin := time.Now(); time.Since(begin) < work; {
	}
	return !IsOverdue(due)
}
