# ---- This is <MW_field_io.py> ----

"""
Read and write gridded fields as flat binary (.img) or CSV payloads with a JSON header (.hdr)
"""

import json
import pathlib

from loguru import logger

import numpy as np

import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_grid_field as MW_gf

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

FIELD_FORMATS = ['img', 'csv']

# -------------------------------------------------------------------------- #

def _paths(path, fmt=None):

    path = pathlib.Path(path).expanduser().absolute()
    if fmt is None:
        fmt = path.suffix.lstrip('.') if path.suffix.lstrip('.') in FIELD_FORMATS else 'img'
    data_path = path.with_suffix(f'.{fmt}')
    hdr_path = path.with_suffix('.hdr')
    return data_path, hdr_path, fmt

# -------------------------------------------------------------------------- #

def save_field(f, path, fmt='img', overwrite=False, extra=None):
    """Write a field to disk

    Parameters
    ----------
    f : Field
    path : output path (suffix replaced by .img/.csv and .hdr)
    fmt : 'img' (flat little-endian float64) or 'csv' (x, y, u1..uk) (default='img')
    overwrite : overwrite existing files (default=False)
    extra : additional JSON-serializable header entries

    Returns
    -------
    data_path : path of the written payload, None if skipped
    """

    if fmt not in FIELD_FORMATS:
        logger.error(f'{fmt} is not a valid choice for fmt')
        raise ValueError(f'{fmt} is not a valid choice for fmt')

    data_path, hdr_path, fmt = _paths(path, fmt)

    logger.debug(f'data_path: {data_path}')
    logger.debug(f'hdr_path:  {hdr_path}')

    if data_path.is_file() and not overwrite:
        logger.info('Output file already exists, use `--overwrite` to force')
        return None

    data_path.parent.mkdir(parents=True, exist_ok=True)

    grid = f.grid
    n_nodes = grid.shape[0] * grid.shape[1]
    header = {
        'format': fmt,
        'grid': grid.header(),
        'k': int(f.k),
        'epsilon': float(f.epsilon),
        'bc': f.bc,
        'n_nodes': int(n_nodes),
        'dtype': 'float64',
        'byte_order': 'little',
        'layout': 'node-major [j, i], components fastest',
    }
    if extra:
        header.update(extra)

    if fmt == 'img':
        f.values.astype('<f8').reshape(-1).tofile(data_path)
    else:
        X, Y = grid.XY
        table = np.column_stack([X.ravel(), Y.ravel(), f.values.reshape(n_nodes, f.k)])
        names = ['x', 'y'] + [f'u{m + 1}' for m in range(f.k)]
        np.savetxt(data_path, table, delimiter=',', header=','.join(names), comments='', fmt='%.17g')

    with open(hdr_path, 'w') as fp:
        json.dump(header, fp, indent=2, sort_keys=True)

    return data_path

# -------------------------------------------------------------------------- #

def read_header(path):
    """Read the JSON header belonging to a field file"""

    _, hdr_path, _ = _paths(path)
    if not hdr_path.is_file():
        logger.error(f'Cannot find field header: {hdr_path}')
        raise FileNotFoundError(f'Cannot find field header: {hdr_path}')

    try:
        with open(hdr_path) as fp:
            return json.load(fp)
    except json.JSONDecodeError as E:
        logger.error(f'Malformed field header {hdr_path}: line {E.lineno}, column {E.colno}: {E.msg}')
        raise MW_err.FieldFormatError(f'Malformed field header {hdr_path}: line {E.lineno}: {E.msg}')

# -------------------------------------------------------------------------- #

def load_field(path):
    """Load a field written by save_field, validating header against payload

    Parameters
    ----------
    path : path to the .img, .csv or .hdr file

    Returns
    -------
    f : Field
    """

    header = read_header(path)
    data_path, _, fmt = _paths(path, header.get('format'))

    if not data_path.is_file():
        logger.error(f'Cannot find field payload: {data_path}')
        raise FileNotFoundError(f'Cannot find field payload: {data_path}')

    try:
        grid_hdr = header['grid']
        k = int(header['k'])
        n_nodes = int(header['n_nodes'])
        grid = MW_gf.grid_from_spec(grid_hdr['shape_spec'], grid_hdr['h'])
    except KeyError as E:
        logger.error(f'Field header misses key {E}')
        raise MW_err.FieldFormatError(f'Field header misses key {E}')

    if (grid.nx, grid.ny) != (grid_hdr['nx'], grid_hdr['ny']) or grid.shape[0] * grid.shape[1] != n_nodes:
        logger.error('Grid rebuilt from header does not match the stored node counts')
        raise MW_err.FieldFormatError('Grid rebuilt from header does not match the stored node counts')

    if fmt == 'img':
        payload = np.fromfile(data_path, dtype='<f8')
        if payload.size != n_nodes * k:
            logger.error(f'Payload holds {payload.size} values, header expects {n_nodes * k}')
            raise MW_err.FieldFormatError(f'Payload holds {payload.size} values, header expects {n_nodes * k}')
        values = payload.reshape(grid.shape + (k,))
    else:
        table = np.loadtxt(data_path, delimiter=',', skiprows=1, ndmin=2)
        if table.shape != (n_nodes, k + 2):
            logger.error(f'CSV payload has shape {table.shape}, header expects {(n_nodes, k + 2)}')
            raise MW_err.FieldFormatError(f'CSV payload has shape {table.shape}, header expects {(n_nodes, k + 2)}')
        values = table[:, 2:].reshape(grid.shape + (k,))

    return MW_gf.make_field(grid, values, header['epsilon'], header.get('bc', 'dirichlet'))

# -------------------------------------------------------------------------- #

def save_density(grid, density, epsilon, path, overwrite=False, name='density'):
    """Write a per-node scalar array in the field format for plotting"""

    f = MW_gf.Field(grid, np.asarray(density, dtype=float).reshape(grid.shape + (1,)), epsilon, 'dirichlet')
    return save_field(f, path, 'img', overwrite, extra={'quantity': name})

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_field_io.py> ----
