"""adjunct-cc: pointer disaggregation toolkit for a C subset.

Splits pointers used as iterators into a fixed container handle plus a signed
integer offset variable, exposing static array-style accesses to loop
analysis. Ships with a dependence analyzer and a tracing interpreter used as
a differential correctness oracle.
"""

__version__ = "0.1.0"
