"""Worked families: U-statistics, kernel quadratic forms, Rosenblatt cumulants, variance-gamma."""
