import json
import os
import subprocess
import sys

import pytest

from conftest import DATA
from torick.cli import main, parse, payload, run
from torick.errors import ParseError, SchemaError
from torick.fan import Beta, Subgroup
from torick.ktheory import k0_presentation
from torick.laurent.poly import LaurentPoly
from torick.laurent.presentation import RingPresentation

FILES = sorted(f[:-5] for f in os.listdir(DATA) if f.endswith(".json"))


def read(name):
    with open(os.path.join(DATA, name + ".json")) as fh:
        return fh.read()


def doc(**kw):
    d = {"lattice_rank": 1, "rays": [[1], [-1]], "max_cones": [[1], [2]], "group": {"kind": "trivial"}}
    d.update(kw)
    return json.dumps(d)


# -- parsing ----------------------------------------------------------------


def test_parse_p2():
    ff = parse(read("p2"))
    assert len(ff.rays) == 3 and len(ff.max_cones) == 3
    assert ff.max_cones[0] == (0, 1)


def test_non_primitive_ray():
    with pytest.raises(SchemaError) as e:
        parse(doc(lattice_rank=2, rays=[[2, 0], [0, 1]], max_cones=[[1, 2]]))
    assert e.value.field == "rays[0]" and "ray not primitive" in str(e.value)


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse('{\n  "lattice_rank": 1,\n  "rays": [[1],\n}')
    assert (e.value.line, e.value.column) == (4, 1)


@pytest.mark.parametrize("bad, field", [
    (doc(lattice_rank=1.0), "lattice_rank"),
    (doc(rays=[[1], [True]]), "rays[1][0]"),
    (doc(rays=[[1, 0], [-1]]), "rays[0]"),
    (doc(max_cones=[[1], [3]]), "max_cones[1][0]"),
    (doc(group={"kind": "torus"}), "group.kind"),
    (doc(group={"kind": "subgroup"}), "group.generators"),
    (doc(group={"kind": "beta", "beta": [[1]], "target": {"free_rank": 0, "torsion": [2, 3]}}),
     "group.target.torsion[1]"),
    (doc(group={"kind": "beta", "beta": [[1]], "target": {"free_rank": 1, "torsion": [2]}}), "group.beta"),
    (doc(extra=1), "extra"),
    (doc(bundle={"base_vars": ["u"], "units": ["w"]}), "bundle.units[0]"),
    (doc(weights=[1, 0]), "weights[1]"),
    ("[1, 2]", "document"),
])
def test_schema_errors(bad, field):
    with pytest.raises(SchemaError) as e:
        parse(bad)
    assert e.value.field == field


def test_parse_is_syntactic_for_beta():
    text = doc(group={"kind": "beta", "beta": [[0]], "target": {"free_rank": 1, "torsion": []}})
    ff = parse(text)
    assert isinstance(ff.group, Beta)
    status, report, _ = run("k0", text)
    assert status == 1 and report["error"]["type"] == "NotFiniteIndex"


def test_parse_groups_and_bundle():
    ff = parse(read("p2_mu2"))
    assert isinstance(ff.group, Subgroup)
    ff = parse(read("p2_bundle"))
    assert ff.bundle.base_vars == ("u1", "u2")
    assert parse(read("wps_1_2")).weights == (1, 2)


# -- commands ---------------------------------------------------------------


def test_k0_p1_mu2():
    status, report, _ = run("k0", read("p1_mu2"))
    assert status == 0
    assert len(report["result"]["presentation"]["relations"]) == 2
    assert report["result"]["quotient"]["z_rank"] == 4
    assert all(report["verification"].values())


def test_wps_weights_without_file():
    status, report, _ = run("wps", None, weights=(1, 2))
    assert status == 0
    rel = report["result"]["presentation"]["relations"][0]
    t = LaurentPoly.variable(1, 0)
    assert LaurentPoly.from_json(1, rel) == (1 - t) * (1 - t ** 2)
    assert report["result"]["quotient"]["z_rank"] == 3


def test_order_single_cone_rejected():
    status, report, lines = run("order", read("single_cone"))
    assert status == 1 and report["error"]["type"] == "NotCompleteOrSmooth"
    assert any("NotCompleteOrSmooth" in line for line in lines)


def test_resource_limit_exit_code():
    status, report, _ = run("tor", read("p1xp2"), step_budget=100)
    assert status == 2 and report["status"] == "resource_limit"


def test_invalid_fan_rejected():
    text = doc(lattice_rank=2, rays=[[1, 0], [0, 1], [1, 1]], max_cones=[[1, 2], [2, 3]])
    status, report, _ = run("validate", text)
    assert status == 1 and report["result"]["validation"]["failures"][0]["kind"] == "overlap"
    assert run("k0", text)[0] == 1


def test_input_errors():
    assert run("k0", "{")[0] == 3
    assert run("bundle", read("p1"))[0] == 3
    assert run("reduce", read("p1"))[0] == 3
    assert run("k0", None)[0] == 3


def test_reduce_b_mu2():
    status, report, _ = run("reduce", read("b_mu2"))
    assert status == 0
    red = report["result"]["reduction"]
    assert red["beta_prime"] == [[2]] and red["M_prime"] == [[2]] and red["character_group"] == "Z/2"


def test_bundle_command():
    status, report, _ = run("bundle", read("p1_bundle"))
    assert status == 0 and report["result"]["rank"]["a_rank"] == 2
    assert report["verification"]["units_to_one_gives_fiber_k0"]


@pytest.mark.parametrize("name", FILES)
def test_determinism(name):
    for cmd in ("analyze", "k0", "order"):
        a = run(cmd, read(name), seed=4)
        b = run(cmd, read(name), seed=4)
        assert json.dumps(payload(a[1])) == json.dumps(payload(b[1]))
        assert a[0] == b[0]


@pytest.mark.parametrize("name", FILES)
def test_round_trip(name):
    status, report, _ = run("k0", read(name))
    if status != 0:
        return
    assert report["verification"]["presentation_round_trip"]
    back = RingPresentation.from_json(json.loads(json.dumps(report["result"]["presentation"])))
    ff = parse(read(name))
    assert back.same_ideal(k0_presentation(ff.stacky_fan))


def test_main_writes_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["k0", os.path.join(DATA, "p2.json"), "--json", "--out", str(out)])
    assert code == 0
    printed = json.loads(capsys.readouterr().out)
    assert json.loads(out.read_text()) == printed
    assert printed["result"]["quotient"]["z_rank"] == 3


def test_main_text_output(capsys):
    assert main(["tor", os.path.join(DATA, "p1.json"), "--smax", "1"]) == 0
    text = capsys.readouterr().out
    assert "Tor_0 = Z + Z" in text and "Tor_1 = 0" in text


def test_main_bad_weights(capsys):
    assert main(["wps", "--weights", "1,x"]) == 3


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "torick", "wps", "--weights", "1,1,1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "Z-rank 3" in r.stdout
