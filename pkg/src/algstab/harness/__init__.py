"""Experiment harness: config loading, trial runners, reports and plots."""
