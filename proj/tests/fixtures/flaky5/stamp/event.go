package stamp

import (
	"strings"
	"time"
)

type Event struct {
	Name string
	At   time.Time
}

func normalize(name string) string {
	for begin := time.Now(); time.Since(begin) < 300*time.Microsecond; {
	}
	return strings.ToLower(strings.TrimSpace(name))
}

// NewEvent stamps a named event with the current time.
func NewEvent(name string) Event {
	n := normalize(name)
	return Event{Name: n, At: time.Now()}
}
