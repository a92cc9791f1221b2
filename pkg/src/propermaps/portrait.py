"""Grid evaluation artifacts: CSV tables and PPM (P6) phase portraits."""

import numpy as np

from .geom import GeometryError
from .grunsky import cayley


def evaluation_grid(domain, width, height, margin=0.02):
    """Rectangular grid over the domain bounding box with an inside mask."""
    flat = domain.flat_nodes()
    pad = margin * domain.diameter
    xs = np.linspace(flat.real.min() - pad, flat.real.max() + pad, width)
    ys = np.linspace(flat.imag.min() - pad, flat.imag.max() + pad, height)
    zz = xs[None, :] + 1j * ys[:, None]
    inside = np.zeros(zz.shape, dtype=bool)
    guard = 1.5 * domain.node_spacing()
    for i in range(height):
        for j in range(width):
            z = zz[i, j]
            if domain.boundary_distance(z) < guard:
                continue
            try:
                inside[i, j] = domain.contains(z)
            except GeometryError:
                inside[i, j] = False
    return zz, inside


def grid_values(fmap, width, height):
    """Map values on the grid; points outside the domain are NaN."""
    zz, inside = evaluation_grid(fmap.domain, width, height)
    vals = np.full(zz.shape, np.nan + 1j * np.nan, dtype=complex)
    pts = zz[inside]
    if len(pts):
        vals[inside] = fmap.interior(pts.ravel())
    return zz, inside, vals


def write_grid_csv(path, fmap, width, height):
    zz, inside, vals = grid_values(fmap, width, height)
    near = np.zeros(zz.shape, dtype=bool)
    if np.any(inside):
        near[inside] = fmap.near_pole(zz[inside].ravel())
    with open(path, "w") as fh:
        fh.write("x,y,re_f,im_f,disc_abs,near_pole\n")
        for i in range(zz.shape[0]):
            for j in range(zz.shape[1]):
                if not inside[i, j]:
                    continue
                w = vals[i, j]
                d = abs(complex(cayley(np.array(w))))
                fh.write("%.17g,%.17g,%.17g,%.17g,%.17g,%d\n"
                         % (zz[i, j].real, zz[i, j].imag, w.real, w.imag,
                            d, int(near[i, j])))
    return zz, inside, vals


def _hsv_to_rgb(h, s, v):
    i = np.floor(h * 6.0).astype(int) % 6
    f = h * 6.0 - np.floor(h * 6.0)
    p = v * (1.0 - s)
    q = v * (1.0 - f * s)
    t = v * (1.0 - (1.0 - f) * s)
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return r, g, b


def write_phase_portrait(path, fmap, width, height):
    """PPM P6 phase portrait of the disc image: hue = argument, value by modulus."""
    _, inside, vals = grid_values(fmap, width, height)
    disc = np.full(vals.shape, np.nan + 0j, dtype=complex)
    finite = inside & np.isfinite(vals)
    disc[finite] = cayley(vals[finite])

    hue = np.zeros(vals.shape)
    val = np.zeros(vals.shape)
    hue[finite] = (np.angle(disc[finite]) / (2.0 * np.pi)) % 1.0
    mod = np.abs(disc[finite])
    val[finite] = np.clip(mod, 0.0, 1.0)
    r, g, b = _hsv_to_rgb(hue, np.ones_like(hue), val)
    rgb = np.stack([r, g, b], axis=-1)
    rgb[~finite] = 0.0
    img = (np.clip(rgb, 0, 1) * 255.0 + 0.5).astype(np.uint8)
    img = img[::-1]  # image rows run top to bottom
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        fh.write(img.tobytes())
