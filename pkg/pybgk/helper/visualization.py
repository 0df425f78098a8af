import math
import matplotlib.pyplot as plt
import matplotlib.gridspec as grd
import numpy as np
from mpl_toolkits.axes_grid1 import make_axes_locatable


def basicplot(data, ticks, channels=1, offset=0, scale=1,
              cn=None, ax=None, typ='plot', cmap='twilight',
              xlim=None, ylim=None, xlabel='', ylabel='',
              show_bar=False,
              **kwargs):
    """Basic plot used by the pybgk plotting helpers.

    Parameters
    ----------
        data : numpy.ndarray
            data array, one column per channel for typ 'plot' and
            'semilogy', a 2D image for 'mesh'
        ticks : numpy.ndarray or tuple
            abscissae, or (x, y) grids for 'mesh'
        channels : int
            number of channels (Default value = 1)
        ax : matplotlib.axes, optional
            Plot on the given axis. Default is None, which uses plt.gca()
        typ : str, optional
            'plot', 'semilogy' or 'mesh'
        cn : list of str, optional
            channel names, used as legend labels

    Returns
    -------
    p, ax : artist of the last channel and the axis
    """
    ax = ax or plt.gca()
    data = np.asarray(data)
    if typ in ('plot', 'semilogy'):
        draw = ax.plot if typ == 'plot' else ax.semilogy
        cols = data.reshape(len(data), -1)
        for idx in range(cols.shape[1]):
            label = cn[idx] if cn and idx < len(cn) else None
            p = draw(ticks, idx * offset + cols[:, idx] * scale, label=label, **kwargs)
        if cn:
            ax.legend()
    elif typ == 'mesh':
        # ticks is (x, y)
        p = ax.pcolormesh(ticks[0], ticks[1], data, cmap=plt.get_cmap(cmap),
                          shading='auto', **kwargs)
    else:
        raise ValueError(f"unknown plot type {typ!r}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if xlim:
        ax.set_xlim([xlim[0], xlim[1]])
    if ylim:
        ax.set_ylim([ylim[0], ylim[1]])
    # Colorbar
    if show_bar:
        divider = make_axes_locatable(ax)
        cax = divider.append_axes('right', size="2%", pad=0.03)
        _ = plt.colorbar(p, cax=cax)
    return p, ax


def branchplot(curves, ax=None, part='real', **kwargs):
    """Plot traced branches lambda(k), one line per BranchCurve.

    Terminated branches get a marker at their critical wave number.
    """
    ax = ax or plt.gca()
    p = None
    for curve in curves:
        values = curve.values.real if part == 'real' else curve.values.imag
        p, ax = basicplot(values, curve.ks, ax=ax, xlabel='k',
                          ylabel=f"{part} part of lambda", cn=[curve.label.value], **kwargs)
        if curve.terminated:
            ax.axvline(curve.k_terminal, linestyle=':', color=p[0].get_color())
    if curves:
        ax.axhline(-1. / curves[0].tau, color='k', linewidth=0.5)
    return p, ax


def coefficientplot(ks, values, references=None, ax=None, names=None, **kwargs):
    """Transport coefficients over k, with optional leading-order references dashed."""
    ax = ax or plt.gca()
    names = names or [f"c{j + 1}" for j in range(np.shape(values)[1])]
    p, ax = basicplot(values, ks, ax=ax, cn=names, xlabel='k', ylabel='coefficient', **kwargs)
    if references is not None:
        ax.set_prop_cycle(None)
        basicplot(references, ks, ax=ax, linestyle='--')
    return p, ax


def dethplot(ks, dets, ax=None, **kwargs):
    """det H over k with the zero line."""
    p, ax = basicplot(dets, ks, ax=ax, xlabel='k', ylabel='det H', **kwargs)
    ax.axhline(0., color='k', linewidth=0.5)
    return p, ax


def argumentplot(func, rectangle, n=200, ax=None, show_bar=True, **kwargs):
    """Phase portrait arg f(lambda) over a rectangle of the lambda plane.

    Zeros show up as points where all colours meet, winding counter-clockwise.
    """
    x = np.linspace(rectangle.re_min, rectangle.re_max, n)
    y = np.linspace(rectangle.im_min, rectangle.im_max, n)
    xx, yy = np.meshgrid(x, y)
    phase = np.vectorize(lambda z: np.angle(func(z)))(xx + 1j * yy)
    return basicplot(phase, (x, y), typ='mesh', ax=ax, show_bar=show_bar,
                     xlabel='Re lambda', ylabel='Im lambda', **kwargs)


def gridplot(plotters, colwrap=1, figsize=None):
    """Draw several plots into one figure.

    Parameters
    ----------
    plotters : list
        (title, callable) pairs; each callable takes ax as keyword
    colwrap : int, optional
        number of columns. Default is 1.
    figsize : tuple, optional
        width, height of the entire image in inches.

    Returns
    -------
    fig : plt.figure()
    """
    nplots = len(plotters)
    if colwrap < 1:
        raise ValueError("col_wrap needs to an integer > 0")
    ncol = colwrap
    nrow = max(1, math.ceil(nplots / ncol))
    fig = plt.figure(figsize=figsize, constrained_layout=True)
    grid = grd.GridSpec(nrow, ncol, figure=fig)
    for idx, (title, draw) in enumerate(plotters):
        ax = fig.add_subplot(grid[idx])
        ax.set_title(title[:30] + "..." if len(title) > 30 else title)
        draw(ax=ax)
    return fig
