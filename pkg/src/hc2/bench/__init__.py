"""Benchmark harness: experiments, metrics and statistical comparison."""
