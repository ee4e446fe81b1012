"""Smoke test for the Python bindings.

Build first with `cargo build -p modelxp-python`, then run
`python3 python/smoke_test.py`. The shared library is copied next to a
temporary `modelxp.so` so no packaging step is needed. Set MODELXP_LIB to
point at a different build.
"""

import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    lib = os.environ.get("MODELXP_LIB")
    if lib is None:
        for profile in ("release", "debug"):
            cand = os.path.join(ROOT, "target", profile, "libmodelxp_py.so")
            if os.path.exists(cand):
                lib = cand
                break
    if lib is None:
        sys.exit("libmodelxp_py.so not found; run `cargo build -p modelxp-python`")
    tmp = tempfile.mkdtemp()
    shutil.copy(lib, os.path.join(tmp, "modelxp.so"))
    sys.path.insert(0, tmp)
    import modelxp

    return modelxp


def main():
    mx = load()

    dl = mx.Model.from_dict({
        "kind": "dl",
        "rules": [
            {"term": [["x", 1], ["y", 1]], "class": 0},
            {"term": [["x", 0], ["z", 0]], "class": 1},
            {"term": [["y", 0], ["z", 1]], "class": 0},
            {"term": [], "class": 1},
        ],
    })
    assert dl.kind == "dl"
    assert dl.features == ["x", "y", "z"]
    e = {"x": 0, "y": 0, "z": 1}
    assert dl.classify(e) is False
    assert dl.classify([False, False, True]) is False

    laxp = {"kind": "laxp", "target": e, "k": 2}
    res = mx.explain(dl, laxp)
    assert res["status"] == "witness", res
    assert res["witness"] == ["y", "z"], res
    assert mx.verify(dl, laxp, res["witness"], minimal=True)
    assert mx.oracle(dl, laxp) == ["y", "z"]

    lcxp = {"kind": "lcxp", "target": e, "k": 1}
    res = mx.explain(dl, lcxp)
    assert res["algorithm"] == "branching", res
    assert res["size"] == 1
    assert not mx.verify(dl, lcxp, [])

    # Round trip through JSON text.
    again = mx.Model.from_json(dl.to_json())
    assert again.to_dict() == dl.to_dict()

    params = dl.parameters()
    assert params["terms_elem"] == 4 and params["term_size"] == 2, params

    circuit = mx.compile_circuit(dl, True)
    assert isinstance(circuit, dict)

    model, query, info = mx.generate("mcc_dt_ensemble", {
        "vertices": [{"name": "a", "part": 0}, {"name": "b", "part": 1}, {"name": "c", "part": 2}],
        "edges": [["a", "b"], ["b", "c"], ["a", "c"]],
    })
    assert len(model) == 11, len(model)
    assert query["kind"] == "gaxp"
    assert mx.explain(model, query)["status"] == "none"

    try:
        mx.explain(dl, {"kind": "laxp", "target": {"x": 0}})
    except ValueError:
        pass
    else:
        raise AssertionError("incomplete example accepted")

    print("python smoke test ok")


if __name__ == "__main__":
    main()
