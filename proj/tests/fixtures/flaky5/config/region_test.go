package config

import (
	"os"
	"testing"
)

func TestOverride(t *testing.T) {
	os.Setenv("APP_REGION", "eu-west")
	if got := Region(); got != "eu-west" {
		t.Errorf("Region() = %q, want eu-west", got)
	}
}

func TestRegion(t *testing.T) {
	tests := []struct {
		name string
		want string
	}{
		{name: "default", want: DefaultRegion},
	}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) {
			if got := Region(); got != tt.want {
				t.Errorf("Region() = %q, want %q", got, tt.want)
			}
		})
	}
}
