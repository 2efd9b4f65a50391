"""Provider-side adapter bridging generation backends to the benchmark harness."""

from purecolor_adapter.bridge import AdapterError, AdapterJob, run_adapter

__version__ = "0.1.0"
