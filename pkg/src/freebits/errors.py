"""Exception hierarchy shared by all freebits modules."""


class FreeBitsError(Exception):
    pass


class ParseError(FreeBitsError, ValueError):
    """A document is malformed: bad JSON/CSV, wrong type, missing or unknown field."""


class ValidationError(FreeBitsError, ValueError):
    """A well-formed document violates a structural invariant."""


class NotProfiledError(FreeBitsError, KeyError):
    """A (layer type, precision) pair has no latency dictionary entry."""

    def __init__(self, key, pair):
        self.key = key
        self.pair = pair
        super().__init__(f"not profiled: {key} at {pair}")

    def __str__(self):
        return self.args[0]


class UnprofiledConfigError(FreeBitsError, LookupError):
    """A layer's configured precision is missing from the latency dictionary."""

    def __init__(self, layer_id, pair):
        self.layer_id = layer_id
        self.pair = pair
        super().__init__(f"unprofiled current configuration: layer {layer_id!r} at {pair}")


class TopologyMismatchError(FreeBitsError, ValueError):
    pass


class SearchSpaceError(FreeBitsError, ValueError):
    pass
