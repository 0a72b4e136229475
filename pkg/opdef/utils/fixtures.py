import os
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, model_validator

from opdef.utils.paths import attach_root_path


class OpdefFixtures(BaseModel):
    """
    Container for file-system fixtures bundled with opdef.

    Paths are resolved relative to the project root during validation. The
    bundled operator corpus (shifts, projections, scalar-plus-compact
    examples, ...) lives in ``opdef/resources/operators`` and is addressed
    by file stem, e.g. ``"shift_left"``.
    """

    OPERATORS_DIR_PATH: Path = None

    SPEC_ENDING: str = ".json"

    @model_validator(mode="after")
    def operators_fixture_validator(self):
        """
        Resolve and attach default fixture paths.

        :return:
            The validated fixture configuration instance.
        :rtype: OpdefFixtures
        """

        self.OPERATORS_DIR_PATH = Path(attach_root_path(os.path.join("opdef",
                                                                     "resources",
                                                                     "operators")))
        return self

    def list_operators(self) -> List[str]:
        """
        Names of all bundled operator specs, sorted.

        :rtype: list[str]
        """

        return sorted(p.stem for p in self.OPERATORS_DIR_PATH.glob(f"*{self.SPEC_ENDING}"))

    def operator_path(self, name: str) -> Optional[Path]:
        """
        Resolve a bundled operator spec by name.

        :param name:
            File stem of the bundled spec (with or without ``.json``).
        :type name: str
        :return:
            Path to the spec, or ``None`` if no such spec is bundled.
        :rtype: pathlib.Path or None
        """

        stem = name[:-len(self.SPEC_ENDING)] if name.endswith(self.SPEC_ENDING) else name
        path = self.OPERATORS_DIR_PATH / f"{stem}{self.SPEC_ENDING}"
        return path if path.exists() else None
