class Valuation:
    """
    Valuations of counting variables, stored as tuples of (variable, value) pairs
    in the variable order of one formula so they can serve as memo keys.

    Values saturate at ``cap``: a counter beyond the largest constant of the formula
    cannot change the truth of any variable constraint.
    """

    def __init__(self, order, cap=None):
        self.order = tuple(order)
        self.rank = {var: i for i, var in enumerate(self.order)}
        self.cap = cap

    def restrict(self, values, variables):
        """Tuple form of ``values`` (a dict) restricted to ``variables``."""
        return tuple(sorted(((var, values[var]) for var in variables), key=lambda item: self.rank[item[0]]))

    def bump(self, values, variables):
        """Increment the ``variables`` of the tuple ``values``, saturating at the cap."""
        result = []
        for var, value in values:
            if var in variables:
                value = value + 1 if self.cap is None else min(value + 1, self.cap)
            result.append((var, value))
        return tuple(result)
