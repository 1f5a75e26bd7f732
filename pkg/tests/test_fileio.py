"""File formats: matrix CSV, coordinate loaders, deterministic JSON."""

import json

import numpy as np
import pytest

from edmshrink import fileio


class TestSquareMatrixCsv:
    def test_round_trip(self, tmp_path, rng):
        a = rng.normal(size=(5, 5))
        a = (a + a.T) / 2
        np.fill_diagonal(a, 0.0)
        path = tmp_path / "m.csv"
        fileio.save_square_matrix(a, path)
        back = fileio.load_square_matrix(path)
        assert np.array_equal(back, a)

    def test_header_line_optional(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,1\n1,0\n")
        assert fileio.load_square_matrix(path)[0, 1] == 1.0

    def test_symmetrizes_within_tolerance(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,1.0000000001\n1,0\n")
        m = fileio.load_square_matrix(path, tol=1e-9)
        assert m[0, 1] == m[1, 0]

    def test_rejects_asymmetry(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,2\n1,0\n")
        with pytest.raises(ValueError, match="asymmetry"):
            fileio.load_square_matrix(path)

    def test_rejects_nonzero_diagonal_in_hollow_mode(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n2,1\n")
        with pytest.raises(ValueError, match="diagonal"):
            fileio.load_square_matrix(path, hollow=True)
        loaded = fileio.load_square_matrix(path, hollow=False)
        assert loaded[0, 0] == 1.0

    def test_rejects_ragged_rows(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,1\n1,0,3\n")
        with pytest.raises(ValueError, match="columns"):
            fileio.load_square_matrix(path)

    def test_reports_line_numbers(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,1\n1,zap\n")
        with pytest.raises(ValueError, match="m.csv:2"):
            fileio.load_square_matrix(path)

    def test_header_only_at_top(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,1\n# nope\n1,0\n")
        with pytest.raises(ValueError, match="header"):
            fileio.load_square_matrix(path)


class TestCoordLoaders:
    def test_csv_two_points(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("0,0,0\n1,0,0\n")
        coords = fileio.load_coords(path, "csv")
        assert coords.shape == (2, 3)
        d = np.sum((coords[0] - coords[1]) ** 2)
        assert d == 1.0

    def test_csv_needs_two_points(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("0,0,0\n")
        with pytest.raises(ValueError, match="at least 2"):
            fileio.load_coords(path, "csv")

    def test_xyz_chemical_format(self, tmp_path):
        path = tmp_path / "p.xyz"
        path.write_text("3\nwater-ish comment\nO 0.0 0.0 0.0\n"
                        "H 0.96 0.0 0.0\nH -0.24 0.93 0.0\n")
        coords = fileio.load_coords(path, "xyz")
        assert coords.shape == (3, 3)
        assert coords[1, 0] == pytest.approx(0.96)

    def test_xyz_blank_comment(self, tmp_path):
        path = tmp_path / "p.xyz"
        path.write_text("2\n\nC 0 0 0\nC 1 1 1\n")
        assert fileio.load_coords(path, "xyz").shape == (2, 3)

    def test_xyz_bare_table(self, tmp_path):
        path = tmp_path / "p.xyz"
        path.write_text("0 0\n1 0\n0 1\n")
        assert fileio.load_coords(path, "xyz").shape == (3, 2)

    def test_xyz_count_mismatch(self, tmp_path):
        path = tmp_path / "p.xyz"
        path.write_text("5\ncomment\nC 0 0 0\n")
        with pytest.raises(ValueError, match="announces"):
            fileio.load_coords(path, "xyz")

    def test_pdb_atom_records(self, tmp_path):
        lines = [
            "HEADER    TEST",
            "ATOM      1  N   MET A   1      11.104   6.134  -6.504  1.00  0.00           N",
            "HETATM    2  O   HOH A   2       0.000   0.000   0.000  1.00  0.00           O",
            "ATOM      3  CA  MET A   1      11.639   6.071  -5.147  1.00  0.00           C",
            "END",
        ]
        path = tmp_path / "s.pdb"
        path.write_text("\n".join(lines) + "\n")
        coords = fileio.load_coords(path, "pdb")
        assert coords.shape == (2, 3)  # HETATM excluded
        assert coords[0, 0] == pytest.approx(11.104)
        assert coords[1, 2] == pytest.approx(-5.147)

    def test_pdb_keeps_first_model_only(self, tmp_path):
        prefix = "ATOM      1  N   MET A   1".ljust(30)
        atom = prefix + "{:8.3f}{:8.3f}{:8.3f}  1.00  0.00           N"
        lines = ["MODEL        1", atom.format(1, 2, 3), atom.format(4, 5, 6),
                 "ENDMDL", "MODEL        2", atom.format(7, 8, 9),
                 atom.format(1, 1, 1), "ENDMDL", "END"]
        path = tmp_path / "s.pdb"
        path.write_text("\n".join(lines) + "\n")
        coords = fileio.load_coords(path, "pdb")
        assert coords.shape == (2, 3)
        assert coords[1, 0] == pytest.approx(4.0)

    def test_pdb_malformed_reports_line(self, tmp_path):
        path = tmp_path / "s.pdb"
        path.write_text("ATOM      1  N   MET A   1      bad coords here\n")
        with pytest.raises(ValueError, match="s.pdb:1"):
            fileio.load_coords(path, "pdb")

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError, match="unknown coordinate format"):
            fileio.load_coords(tmp_path / "x", "mol2")


class TestEmbeddingWriter:
    def test_header_and_values(self, tmp_path):
        path = tmp_path / "e.csv"
        fileio.save_embedding(np.array([[0.5, -0.5], [-0.5, 0.5]]), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "# squared-distance convention; centered coordinates"
        assert lines[1].split(",")[0] == "0.5"


class TestJsonEmitter:
    def test_round_trip_exact_floats(self, rng):
        vals = list(rng.normal(size=20)) + [1e-300, 1e300, 0.1, 1 / 3]
        text = fileio.dumps_json({"vals": vals})
        back = json.loads(text)
        assert back["vals"] == [float(v) for v in vals]

    def test_seventeen_significant_digits(self):
        text = fileio.dumps_json({"x": 1 / 3})
        assert "0.33333333333333331" in text

    def test_deterministic(self):
        payload = {"b": [1.5, 2, None, True], "a": {"nested": "x"}}
        assert fileio.dumps_json(payload) == fileio.dumps_json(payload)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            fileio.dumps_json({"x": float("nan")})

    def test_rejects_unknown_types(self):
        with pytest.raises(TypeError):
            fileio.dumps_json({"x": object()})

    def test_valid_json_structures(self):
        payload = {"empty_list": [], "empty_dict": {}, "s": 'quote " here',
                   "i": 42, "f": -0.125, "list": [1, [2, {"k": None}]]}
        assert json.loads(fileio.dumps_json(payload)) == payload
