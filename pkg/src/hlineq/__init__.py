"""Mixed-norm Hardy--Littlewood inequalities for m-linear forms on l_p^n."""

__version__ = "0.1.0"
