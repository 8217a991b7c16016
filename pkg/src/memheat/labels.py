"""Binary hot/cold label shared by the queue, learners, baseline and metrics."""

from enum import IntEnum


class HeatLabel(IntEnum):
    COLD = 0
    HOT = 1


# Hot paths compare against plain ints; the enum is for readable APIs/reports.
COLD = int(HeatLabel.COLD)
HOT = int(HeatLabel.HOT)
