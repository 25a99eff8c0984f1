import logging
from typing import Any, Dict, List, Optional

from fastapi import Depends, FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ValidationError

from config.config_loader import WorkbenchConfig, config_loader
from reports import SUITE_NAMES, Report, UnknownSuiteError, beta_report, omega_report, run_check_suite
from reports.models import TOOL, TOOL_VERSION
from symbolic import NonConvergenceError, WorkbenchError

logger = logging.getLogger(__name__)

app = FastAPI(title="VPD Workbench API", version=TOOL_VERSION)

# CORS middleware for a local report viewer
app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:3000", "http://localhost:8080"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

METHOD_NAMES = {"closed": "closed", "oracle": "oracle2d", "mc": "montecarlo"}


# Pydantic models
class SuiteList(BaseModel):
    suites: List[str]


def get_settings() -> WorkbenchConfig:
    """Validated settings; overridden by `main.py serve --config`"""
    return config_loader.settings


def _run(compute, *args, **kwargs) -> Report:
    """Map workbench errors to HTTP status codes"""
    try:
        return compute(*args, **kwargs)
    except UnknownSuiteError as e:
        raise HTTPException(status_code=404, detail=str(e))
    except NonConvergenceError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except (WorkbenchError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.exception("Request failed")
        raise HTTPException(status_code=500, detail=str(e))


# API Routes
@app.get("/")
async def root():
    return {"message": f"{TOOL} API is running", "version": TOOL_VERSION}


@app.get("/api/suites", response_model=SuiteList)
async def get_suites():
    """Names accepted by /api/verify"""
    return SuiteList(suites=list(SUITE_NAMES))


@app.get("/api/verify/{suite}", response_model=Report)
def verify(suite: str, settings: WorkbenchConfig = Depends(get_settings)):
    """Run a check suite and return its report"""
    if suite not in SUITE_NAMES:
        raise HTTPException(status_code=404, detail=f"Unknown suite '{suite}'")
    return _run(run_check_suite, suite, settings, command=["verify", suite])


@app.get("/api/omega", response_model=Report)
def omega(
    k: List[int] = Query([1]),
    method: str = Query("closed", pattern="^(closed|oracle|mc)$"),
    settings: WorkbenchConfig = Depends(get_settings),
):
    """Omega_k values with error estimates"""
    if any(value < 0 for value in k):
        raise HTTPException(status_code=400, detail="k must be non-negative")
    command = ["omega", "--k", ",".join(str(value) for value in k), "--method", method]
    return _run(omega_report, settings, k, METHOD_NAMES[method], command=command)


@app.get("/api/beta", response_model=Report)
def beta(
    g: List[float] = Query([0.1]),
    model: str = Query("pure", pattern="^(pure|sm)$"),
    settings: WorkbenchConfig = Depends(get_settings),
):
    """One-loop beta function at the given couplings"""
    command = ["beta", "--model", model, "--g", *(f"{value:g}" for value in g)]
    return _run(beta_report, settings, model, g, command=command)


@app.get("/api/config")
async def get_config(settings: WorkbenchConfig = Depends(get_settings)) -> Dict[str, Any]:
    """Effective configuration"""
    return settings.model_dump(mode="json")


@app.post("/api/config/{section}")
async def update_config(section: str, values: Dict[str, Any]):
    """Merge values into one config section and save it"""
    try:
        config_loader.update_section(section, values)
    except KeyError as e:
        raise HTTPException(status_code=404, detail=str(e))
    except ValidationError as e:
        raise HTTPException(status_code=422, detail=e.errors(include_url=False, include_context=False))
    return {"message": "Configuration updated successfully"}


if __name__ == "__main__":
    import uvicorn
    settings = config_loader.settings
    uvicorn.run(app, host=settings.api.host, port=settings.api.port)
