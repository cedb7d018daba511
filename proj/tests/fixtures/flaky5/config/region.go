package config

import "os"

const DefaultRegion = "us-east"

// Region reads APP_REGION and falls back to the default.
func Region() string {
	if v := lookup("APP_REGION"); v != "" {
		return v
	}
	return DefaultRegion
}

func lookup(key string) string { return os.Getenv(key) }
