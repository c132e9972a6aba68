from dataclasses import dataclass, field

from django.db import models


class Scheme(models.TextChoices):
    DSSR = 'dssr', 'DSSR'
    DSSRC = 'dssrc', 'DSSRC'
    NG = 'ng', 'NG'
    NGC = 'ngc', 'NGC'
    NG_DSSRC = 'ng-dssrc', 'NG-DSSRC'
    NGC_DSSRC = 'ngc-dssrc', 'NGC-DSSRC'

    @property
    def ng_based(self):
        return self in (Scheme.NG, Scheme.NGC, Scheme.NG_DSSRC, Scheme.NGC_DSSRC)


class StepOutcome(models.TextChoices):
    DONE = 'done', 'Done'
    REPEAT = 'repeat', 'Repeat'
    HANDOFF = 'handoff', 'Handoff'


class NeighborhoodMasks:
    """
    Per-node bit masks B_i.

    A label entering node j keeps only the visited bits set in B_j.
    ng_base holds the full NG neighbourhoods for the NGC schemes. Once a
    hybrid scheme hands off, masks grow by DSSRC rules without restriction.
    """

    def __init__(self, scheme, masks, ng_base=None):
        self.scheme = Scheme(scheme)
        self.masks = list(masks)
        self.ng_base = list(ng_base) if ng_base is not None else None
        self.iteration = 0
        self.handed_off = False

    def __repr__(self):
        return f'NeighborhoodMasks({self.scheme.value}, n={len(self.masks)}, iteration={self.iteration})'

    def __len__(self):
        return len(self.masks)

    def __getitem__(self, node):
        return self.masks[node]

    def __iter__(self):
        return iter(self.masks)

    def contains(self, node, other):
        return bool(self.masks[node] >> other & 1)

    def size(self, node):
        return bin(self.masks[node]).count('1')

    def seed(self, nodes):
        """Make nodes elementary everywhere."""
        bits = 0
        for node in nodes:
            bits |= 1 << node
        self.masks = [mask | bits for mask in self.masks]


@dataclass
class CycleReport:
    """Nodes repeated in a tour and, per node, its first-to-last loop span."""

    repeated_nodes: list = field(default_factory=list)
    loop_spans: dict = field(default_factory=dict)

    @property
    def is_elementary(self):
        return not self.repeated_nodes
