"""altcausal: alternating causal order, echo links, event-counted clocks.

Five building blocks:

* ``qcore``       dense operators, states, channels
* ``process``     process matrices, duality families, the order switch
* ``photonclock`` bouncing-photon clock, tick ledger, recurrence cascade
* ``piflink``     echoed slice link and its information accounting
* ``cli``         experiment runner producing JSON / CSV / SVG reports
"""

from . import qcore, process, photonclock, piflink

__version__ = "0.1.0"

__all__ = ["qcore", "process", "photonclock", "piflink", "__version__"]
