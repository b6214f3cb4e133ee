# ---- This is <test_field_io.py> ----

import json

import numpy as np
import pytest

import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_field_io as MW_io
import multiwell_lab.MW_grid_field as MW_gf

from conftest import interface_field

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@pytest.fixture
def vector_field(unit_disk):
    X, Y = unit_disk.XY
    return MW_gf.make_field(unit_disk, np.stack([np.sin(X), X * Y], axis=-1), 0.1, 'neumann')

# -------------------------------------------------------------------------- #

@pytest.mark.parametrize('fmt', MW_io.FIELD_FORMATS)
def test_save_and_load_field(tmp_path, vector_field, fmt):
    data_path = MW_io.save_field(vector_field, tmp_path / 'u', fmt=fmt)
    assert data_path.is_file()
    assert data_path.with_suffix('.hdr').is_file()

    f = MW_io.load_field(data_path)
    assert f.k == 2
    assert f.epsilon == pytest.approx(0.1)
    assert f.bc == 'neumann'
    assert MW_gf.same_domain(f.grid, vector_field.grid)
    assert np.allclose(f.values, vector_field.values, rtol=0, atol=1e-14)

def test_existing_file_is_not_overwritten(tmp_path, square):
    f = interface_field(square, 0.1)
    assert MW_io.save_field(f, tmp_path / 'u') is not None
    assert MW_io.save_field(f.with_values(-f.values), tmp_path / 'u') is None
    assert np.allclose(MW_io.load_field(tmp_path / 'u.img').values, f.values)

    MW_io.save_field(f.with_values(-f.values), tmp_path / 'u', overwrite=True)
    assert np.allclose(MW_io.load_field(tmp_path / 'u.img').values, -f.values)

def test_truncated_payload(tmp_path, square):
    f = interface_field(square, 0.1)
    data_path = MW_io.save_field(f, tmp_path / 'u')
    payload = data_path.read_bytes()
    data_path.write_bytes(payload[:-8])
    with pytest.raises(MW_err.FieldFormatError):
        MW_io.load_field(data_path)

def test_header_missing_key(tmp_path, square):
    f = interface_field(square, 0.1)
    data_path = MW_io.save_field(f, tmp_path / 'u')
    hdr_path = data_path.with_suffix('.hdr')
    header = json.loads(hdr_path.read_text())
    del header['k']
    hdr_path.write_text(json.dumps(header))
    with pytest.raises(MW_err.FieldFormatError):
        MW_io.load_field(data_path)

def test_malformed_header(tmp_path, square):
    f = interface_field(square, 0.1)
    data_path = MW_io.save_field(f, tmp_path / 'u')
    data_path.with_suffix('.hdr').write_text('{"format": "img",')
    with pytest.raises(MW_err.FieldFormatError):
        MW_io.load_field(data_path)

def test_missing_header(tmp_path):
    with pytest.raises(FileNotFoundError):
        MW_io.load_field(tmp_path / 'nothing.img')

def test_invalid_format(tmp_path, square):
    with pytest.raises(ValueError):
        MW_io.save_field(interface_field(square, 0.1), tmp_path / 'u', fmt='npy')

def test_save_density(tmp_path, square):
    density = np.linspace(0.0, 1.0, square.shape[0] * square.shape[1]).reshape(square.shape)
    data_path = MW_io.save_density(square, density, 0.1, tmp_path / 'theta', name='theta')
    assert MW_io.read_header(data_path)['quantity'] == 'theta'
    assert np.allclose(MW_io.load_field(data_path).values[..., 0], density)

# -------------------------------------------------------------------------- #

# ---- End of <test_field_io.py> ----
