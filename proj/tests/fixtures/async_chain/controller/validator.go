package controller

import (
	"context"
	"errors"
	"strings"
)

var ErrNoOwner = errors.New("program has no owner")

func (c *Controller) ValidateIdentity(ctx context.Context, p Program) error {
	if strings.TrimSpace(p.Owner) == "" {
		return ErrNoOwner
	}
	data := p.Owner + "/" + p.Name
	go c.db.UpdateInfo(ctx, data)
	return nil
}
