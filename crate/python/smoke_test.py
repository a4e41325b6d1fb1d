"""Smoke test for the Python bindings: python python/smoke_test.py after installing crates/python."""

import json
import pathlib

import sigma_etale_py as se

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def load(name):
    return (DATA / name).read_text()


def main():
    cert = json.loads(se.execute("check", load("swap.json"), json.dumps({"predicate": "ssetale"})))
    assert cert["certificate"] == se.CERTIFICATE_TAG
    assert cert["verdict"] == "verified" and cert["result"]["holds"]

    ld = json.loads(se.execute("ld", load("radical2.json"), json.dumps({"horizon": 6})))
    assert ld["result"]["value"] == 2, ld["result"]

    bad = json.loads(se.execute("babbitt verify", load("chain_corrupted.json")))
    assert bad["verdict"] == "refuted"

    check = json.loads(se.verify_certificate(json.dumps(cert)))
    assert check["matches"], check
    cert["result"]["holds"] = False
    check = json.loads(se.verify_certificate(json.dumps(cert)))
    assert check["first_difference"] == "result.holds", check

    report = json.loads(se.suite("babbitt", 42))
    assert report["verdict"] == "verified"

    try:
        se.execute("check", "{not json")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed instance accepted")
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
