import io
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from src.miespec import verification_service
from src.miespec.cli import main
from src.miespec.errors import DomainError
from src.miespec.models import ReportStatus, SweepConfig
from src.miespec.verification_service import VerificationService


def sweep(**overrides):
    settings = dict(potentials=[(2.0, 1.0, 0.0)], dimensions=[2], ells=[0], n_r_max=1, fd_levels=2, ladder_n_max=2)
    settings.update(overrides)
    return SweepConfig(**settings)


def names_of(report, kind):
    return [item.name for item in report.items if item.name.startswith(f"{kind}[")]


def test_two_dimensional_s_wave_passes():
    report = VerificationService(sweep()).build_report()
    assert report.passed, [(item.name, item.paper_form) for item in report.mismatches()]
    assert len(names_of(report, "hft_B")) == 2
    assert len(names_of(report, "hft_A")) == 2
    assert len(names_of(report, "virial")) == 2
    assert len(names_of(report, "inv_r2")) == 2
    assert names_of(report, "hft_ell") == []


def test_ell_derivative_recorded_when_centrifugal_weight_is_nonzero():
    report = VerificationService(sweep(dimensions=[2, 3], ells=[0, 1], n_r_max=0)).build_report()
    assert report.passed
    # only the N=2, l=0 channel drops out
    assert len(names_of(report, "hft_ell")) == 3
    assert len(names_of(report, "hft_B")) == 4


def test_failing_item_does_not_hide_its_neighbours(monkeypatch):
    real = verification_service.hft_derivative

    def broken(params, ch, parameter, *args, **kwargs):
        if parameter == "B":
            raise DomainError("B derivative unavailable")
        return real(params, ch, parameter, *args, **kwargs)

    monkeypatch.setattr(verification_service, "hft_derivative", broken)
    report = VerificationService(sweep(dimensions=[3], n_r_max=0)).build_report()
    failed = report.mismatches()
    assert [item.name for item in failed] == names_of(report, "hft_B")
    assert "[failed: B derivative unavailable]" in failed[0].paper_form
    for kind in ("inv_r", "inv_r2", "hft_A", "hft_ell", "virial"):
        statuses = {item.status for item in report.items if item.name.startswith(f"{kind}[")}
        assert statuses == {ReportStatus.MATCH}, kind


def test_verify_command_on_two_dimensional_s_wave():
    out = io.StringIO()
    code = main(["verify", "--A", "2", "--B", "1", "--N", "2", "--l", "0", "--nr", "0", "--format", "json"], out=out)
    assert code == 0
