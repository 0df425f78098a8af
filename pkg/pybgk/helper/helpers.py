# Collection of small helper functions
import logging
from dataclasses import dataclass
import numpy as np
from .errors import DomainError


_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())


def set_logging(level=logging.INFO):
    """Attach a stream handler to the package logger.

    The library itself only installs NullHandlers; call this from scripts
    or the command line to see solver progress.

    Parameters
    ----------
    level : int
        logging level (Default value = logging.INFO)
    """
    logger = logging.getLogger('pybgk')
    if not any(isinstance(h, logging.StreamHandler) and not isinstance(h, logging.NullHandler)
               for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter('%(asctime)s %(name)s %(levelname)s: %(message)s'))
        logger.addHandler(handler)
    logger.setLevel(level)
    return logger


def as_complex(value, name='argument'):
    """Convert to a finite Python complex or raise DomainError."""
    z = complex(value)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise DomainError(f"{name} must be finite, got {z}")
    return z


def double_factorial(n):
    """(n)!! for n >= -1, with (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError("double factorial needs n >= -1")
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


def gaussian_moment(n):
    """Moment E[u**n] of the standard normal distribution.

    Parameters
    ----------
    n : int
        order, n >= 0

    Returns
    -------
    _ : float
        (n - 1)!! for even n, 0 for odd n
    """
    if n < 0:
        raise ValueError("moment order must be non-negative")
    if n % 2:
        return 0.
    return float(double_factorial(n - 1))


def cyclic(seq):
    """The cyclic permutations (a, b, c), (b, c, a), (c, a, b) of a triple."""
    a, b, c = seq
    return [(a, b, c), (b, c, a), (c, a, b)]


def fit_taylor(x, y, powers):
    """Least squares fit of y by a sum of monomials x**p.

    Parameters
    ----------
    x : array_like
        abscissae, e.g. a ladder of small wave numbers
    y : array_like
        ordinates
    powers : sequence of int
        exponents of the monomials

    Returns
    -------
    _ : numpy.ndarray
        coefficients in the order of ``powers``
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    vander = np.stack([x ** p for p in powers], axis=1)
    # column scaling keeps the system well conditioned for tiny x
    scale = np.max(np.abs(vander), axis=0)
    coef, *_ = np.linalg.lstsq(vander / scale, y, rcond=None)
    return coef / scale


@dataclass(frozen=True)
class Rectangle:
    """Axis parallel rectangle in the complex plane, traversed counter-clockwise."""
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"empty rectangle {self}")

    @property
    def corners(self):
        return (complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max))

    def contains(self, z):
        return self.re_min < z.real < self.re_max and self.im_min < z.imag < self.im_max

    def boundary(self, n_per_side):
        """Closed polygon of boundary points, first point repeated at the end."""
        c = self.corners
        t = np.linspace(0., 1., n_per_side, endpoint=False)
        pts = [c[i] + t * (c[(i + 1) % 4] - c[i]) for i in range(4)]
        return np.concatenate(pts + [np.array([c[0]])])

    def gauss_legendre(self, n_per_side):
        """Nodes and complex weights of a Gauss-Legendre rule on the boundary.

        sum(f(nodes) * weights) approximates the counter-clockwise contour
        integral of f.
        """
        x, w = np.polynomial.legendre.leggauss(n_per_side)
        c = self.corners
        nodes, weights = [], []
        for i in range(4):
            a, b = c[i], c[(i + 1) % 4]
            nodes.append(0.5 * (a + b) + 0.5 * (b - a) * x)
            weights.append(0.5 * (b - a) * w)
        return np.concatenate(nodes), np.concatenate(weights)


def winding_number(values):
    """Winding number around the origin of a closed sampled path."""
    values = np.asarray(values, dtype=complex)
    phase = np.unwrap(np.angle(values))
    return int(np.rint((phase[-1] - phase[0]) / (2 * np.pi)))


SCHEMA_PREFIX = 'pybgk-schema:'
SCHEMA_VERSION = 1


def format_value(x):
    """Text form of a table cell; floats use repr, which round-trips."""
    if isinstance(x, (bool, np.bool_)):
        return '1' if x else '0'
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def parse_value(text):
    """Inverse of :func:`format_value`."""
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def write_table(fh, schema, columns, rows, delimiter=',', comments=()):
    """Write a versioned text table.

    The first line is ``# pybgk-schema: <schema> v1``, followed by optional
    comment lines, the column names as a comment and one line per row.
    """
    fh.write(f"# {SCHEMA_PREFIX} {schema} v{SCHEMA_VERSION}\n")
    for line in comments:
        fh.write(f"# {line}\n")
    fh.write("# " + delimiter.join(columns) + "\n")
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row of {len(row)} cells for {len(columns)} columns")
        fh.write(delimiter.join(format_value(x) for x in row) + "\n")


def read_table(fh, delimiter=','):
    """Read a table written by :func:`write_table`.

    Returns
    -------
    _ : tuple
        (schema, comments, columns, rows)
    """
    first = fh.readline().strip()
    parts = first.split()
    if len(parts) != 4 or parts[:2] != ['#', SCHEMA_PREFIX]:
        raise ValueError(f"missing schema line, got {first!r}")
    schema = parts[2]
    comments = []
    rows = []
    for line in fh:
        line = line.rstrip('\n')
        if line.startswith('# '):
            comments.append(line[2:])
        elif line:
            rows.append([parse_value(x) for x in line.split(delimiter)])
    if not comments:
        raise ValueError("missing column line")
    columns = comments.pop().split(delimiter)
    return schema, comments, columns, rows
