"""2Q replacement policy used as a rule-based hot/cold predictor.

Three structures: a probationary FIFO (a1in), a ghost FIFO of evicted page
ids (a1out, no data), and an LRU hot queue (am). A page is predicted hot
when it sits in the hot queue at access time; promotion into the hot queue
requires a re-access after aging out of probation, so a page is never
predicted hot before two non-adjacent accesses.
"""

from collections import OrderedDict, deque


class TwoQ:
    def __init__(self, k_in, k_am, k_out, a1in_counts_hot=False):
        if min(k_in, k_am, k_out) < 1:
            raise ValueError("2Q capacities must be >= 1")
        self.k_in = k_in
        self.k_am = k_am
        self.k_out = k_out
        self.a1in_counts_hot = a1in_counts_hot
        self.a1in = deque()
        self.a1in_set = set()
        self.am = OrderedDict()
        self.a1out = OrderedDict()

    @classmethod
    def scaled_to(cls, horizon, a1in_counts_hot=False):
        """Capacities proportioned to a window of ``horizon`` accesses."""
        return cls(max(1, horizon // 4), max(1, horizon // 2),
                   max(1, horizon // 2), a1in_counts_hot)

    def access(self, page):
        """Predict, then update the structures. Returns 1 for hot, 0 for cold."""
        hot = page in self.am or (self.a1in_counts_hot and page in self.a1in_set)
        prediction = 1 if hot else 0

        if page in self.am:
            self.am.move_to_end(page)
        elif page in self.a1in_set:
            pass  # probation: re-access while resident changes nothing
        elif page in self.a1out:
            del self.a1out[page]
            if len(self.am) >= self.k_am:
                self.am.popitem(last=False)
            self.am[page] = None
        else:
            if len(self.a1in) >= self.k_in:
                old = self.a1in.popleft()
                self.a1in_set.discard(old)
                if len(self.a1out) >= self.k_out:
                    self.a1out.popitem(last=False)
                self.a1out[old] = None
            self.a1in.append(page)
            self.a1in_set.add(page)
        return prediction

    def check_invariants(self):
        """Disjointness and capacity bounds; used by the property tests."""
        sin = self.a1in_set
        sam = set(self.am)
        sout = set(self.a1out)
        assert len(self.a1in) == len(sin)
        assert not (sin & sam) and not (sin & sout) and not (sam & sout)
        assert len(self.a1in) <= self.k_in
        assert len(self.am) <= self.k_am
        assert len(self.a1out) <= self.k_out
