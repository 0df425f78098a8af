from .helpers import *
from .errors import *
from .visualization import basicplot, gridplot, branchplot, coefficientplot, dethplot, argumentplot
