import logging
from typing import Any, Dict

import numpy as np
import pandas as pd

from ..core.errors import ConfigError, TurboxError
from ..models.model_spec import ModelSpec
from ..models.run_config import RunConfig
from ..services.fcs_service import FcsService
from ..services.file_service import FileService
from ..services.lindblad_service import LindbladService
from ..services.optimizer_service import OptimizerService
from ..services.steady_state_service import SteadyStateService
from ..services.tur_service import TurService
from ..services.zoo_service import ZooService
from ..version import __version__

EXIT_OK = 0
EXIT_IO = 1
EXIT_MODEL = 2


class Runner:
    def __init__(self, config: RunConfig):
        logging.info(f"Initializing turbox {__version__} for '{config.command}'")
        self.config = config
        self.file_service = FileService()
        self.zoo_service = ZooService()

    def model(self) -> ModelSpec:
        if self.config.model_spec is not None:
            return self.config.model_spec
        return self.zoo_service.build(self.config.family, self.config.params)

    def run(self) -> int:
        handler = getattr(self, f"_{self.config.command}")
        try:
            return handler()
        except TurboxError as e:
            logging.error(f"Failed to run {self.config.command}: {e}")
            raise

    def _require_format(self, *allowed: str):
        if self.config.format not in allowed:
            raise ConfigError(f"{self.config.command} writes {' or '.join(allowed)}, not {self.config.format}")

    def _validate(self) -> int:
        self._require_format("json")
        lindblad = LindbladService(self.model())
        report = lindblad.validation
        document: Dict[str, Any] = {"validation": report}
        if report.photon_counts:
            document["physical_photon_counts"] = lindblad.physical_photon_counts()
        self.file_service.save_json(document, self.config.output)
        if not report.passed:
            logging.warning(f"Model rejected: {report.summary()}")
            return EXIT_MODEL
        return EXIT_OK

    def _steady(self) -> int:
        self._require_format("json")
        report = SteadyStateService(self.model()).steady_report()
        self.file_service.save_json(report.to_dict(), self.config.output)
        return EXIT_OK

    def _tur(self) -> int:
        self._require_format("json")
        report = TurService(self.model()).uncertainty()
        self.file_service.save_json(report.to_dict(), self.config.output)
        return EXIT_OK

    def _oracle(self) -> int:
        model = self.model()
        fcs = FcsService(model)
        label = self.config.reservoir or TurService(model, cross_check=False).reporting_reservoir()
        chis = np.linspace(-self.config.chi_max, self.config.chi_max, self.config.chi_num)
        curve = fcs.lambda_curve(label, chis)
        if self.config.format == "csv":
            self.file_service.save_table(pd.DataFrame(curve, columns=["chi", "lambda"]), self.config.output)
            return EXIT_OK
        result = fcs.cumulants_numeric(label)
        result.lambda_samples = curve
        self.file_service.save_json(result.to_dict(), self.config.output)
        return EXIT_OK

    def _sweep(self) -> int:
        spec = self.config.spec
        table = OptimizerService(spec.family, spec.fixed).sweep(spec.grid)
        if self.config.format == "csv":
            self.file_service.save_table(table, self.config.output)
        else:
            self.file_service.save_json({"family": spec.family, "rows": table.to_dict(orient="records")}, self.config.output)
        return EXIT_OK

    def _optimize(self) -> int:
        self._require_format("json")
        spec = self.config.spec
        optimizer = OptimizerService(spec.family, spec.fixed)
        kwargs = {"starts": spec.starts} if spec.starts else {}
        best, report = optimizer.minimize_Q(spec.free, seed=spec.seed, **kwargs)
        document = {"family": spec.family, "seed": spec.seed, "fixed": spec.fixed, "best": best, "report": report}
        self.file_service.save_json(document, self.config.output)
        return EXIT_OK
