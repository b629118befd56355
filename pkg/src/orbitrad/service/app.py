"""HTTP service wrapping the orbit-radius library.

Domain errors surface as 400 responses whose detail names the violated
precondition; payload validation failures are FastAPI's usual 422.
"""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

import numpy as np

from .. import __version__
from ..aluthge import aluthge, iterate_aluthge
from ..core import eig_general
from ..errors import OrbitradError
from ..hull import FwBudget, fw_project
from ..optimize import OptimizerConfig, grid_oracle_2x2, hermitian_oracle, maximize_modulus
from ..suites import SUITE_NAMES, commutant_witness, report_to_dict, reports_to_csv, run_suite
from .schemas import (
    AluthgeRequest,
    AluthgeResponse,
    AtomPayload,
    IterationPayload,
    MatrixPayload,
    MembershipRequest,
    MembershipResponse,
    RadiusRequest,
    RadiusResponse,
    SpectrumRequest,
    SpectrumResponse,
    VerifyRequest,
    VerifyResponse,
    WitnessRequest,
    WitnessResponse,
)

app = FastAPI(title="orbitrad", version=__version__)


@app.exception_handler(OrbitradError)
async def _domain_error(request: Request, exc: OrbitradError):
    return JSONResponse(
        status_code=400,
        content={"detail": f"{type(exc).__name__}: {exc}"},
    )


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/radius", response_model=RadiusResponse)
def radius(req: RadiusRequest):
    c = req.c.to_array()
    a = req.a.to_array()
    cfg = OptimizerConfig(starts=req.starts, max_iters=req.max_iters, seed=req.seed)
    res = maximize_modulus(c, a, cfg)
    oracle_value = None
    if req.oracle == "grid":
        oracle_value = grid_oracle_2x2(c, a)
    elif req.oracle == "hermitian":
        oracle_value = hermitian_oracle(c, a)
    return RadiusResponse(
        value=res.value,
        phase=res.phase,
        maximizer=MatrixPayload.from_array(res.maximizer),
        per_start_values=res.per_start_values,
        iterations_used=res.iterations_used,
        converged_flags=res.converged_flags,
        oracle=req.oracle,
        oracle_value=oracle_value,
    )


@app.post("/spectrum", response_model=SpectrumResponse)
def spectrum(req: SpectrumRequest):
    eigs = eig_general(req.t.to_array())
    return SpectrumResponse(
        eigenvalues_re=list(eigs.real), eigenvalues_im=list(eigs.imag)
    )


@app.post("/aluthge", response_model=AluthgeResponse)
def aluthge_transform(req: AluthgeRequest):
    t = req.t.to_array()
    dec = aluthge(t, req.lam)
    iteration = None
    if req.iterate > 0:
        it = iterate_aluthge(t, req.lam, req.iterate)
        iteration = IterationPayload(
            sequence=[MatrixPayload.from_array(m) for m in it.sequence],
            normality_defects=list(it.normality_defects),
            spectrum_drifts=list(it.spectrum_drifts),
            truncated_at=it.truncated_at,
        )
    return AluthgeResponse(
        lam=dec.lam,
        transformed=MatrixPayload.from_array(dec.transformed),
        unitary_factor=MatrixPayload.from_array(dec.unitary_factor),
        modulus=MatrixPayload.from_array(dec.modulus),
        similarity_defect=dec.similarity_defect,
        iteration=iteration,
    )


@app.post("/membership", response_model=MembershipResponse)
def membership(req: MembershipRequest):
    a = req.a.to_array()
    b = req.b.to_array()
    budget = FwBudget(
        max_fw_iters=req.max_fw_iters,
        member_tol=req.member_tol,
        lmo_cfg=OptimizerConfig(
            starts=req.lmo_starts, max_iters=req.lmo_max_iters, seed=req.seed
        ),
    )
    out = fw_project(a, b, budget)
    return MembershipResponse(
        verdict=out.verdict.value,
        final_distance=out.final_distance,
        fw_gap=out.fw_gap if np.isfinite(out.fw_gap) else -1.0,
        iterations=out.iterations,
        coefficient_budget=float(sum(abs(at.z) for at in out.atoms)),
        atoms=[
            AtomPayload(
                z_re=at.z.real, z_im=at.z.imag, u=MatrixPayload.from_array(at.u)
            )
            for at in out.atoms
        ],
        certificate=(
            MatrixPayload.from_array(out.certificate)
            if out.certificate is not None
            else None
        ),
        separation_margin=out.separation_margin,
    )


@app.post("/witness", response_model=WitnessResponse)
def witness(req: WitnessRequest):
    res = commutant_witness(
        req.a.to_array(),
        req.b.to_array(),
        OptimizerConfig(starts=req.starts, max_iters=req.max_iters, seed=req.seed),
    )
    return WitnessResponse(
        commutator_norm=res.commutator_norm, u=MatrixPayload.from_array(res.u)
    )


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    names = list(SUITE_NAMES) if req.suite == "all" else [req.suite]
    reports = [
        run_suite(name, req.trials, tuple(req.dims), req.seed) for name in names
    ]
    total_trials = sum(r.trials for r in reports)
    total_passes = sum(r.passes for r in reports)
    return VerifyResponse(
        passed=(total_passes == total_trials),
        total_trials=total_trials,
        total_passes=total_passes,
        reports=[report_to_dict(r) for r in reports],
        csv=reports_to_csv(reports),
    )
