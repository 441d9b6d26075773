from enum import Enum

from uukin.errors import CODE_CONFIG, new_fatal


class ScenarioEnum(int, Enum):
    SCENARIO_UU = 0
    SCENARIO_MEMORY = 1
    SCENARIO_HIERARCHY = 2
    SCENARIO_BOUNDARY_LAYER = 3
    SCENARIO_SCALES = 4
    SCENARIO_VALIDATE = 5

    @classmethod
    def from_name(cls, name: str) -> "ScenarioEnum":
        try:
            return cls["SCENARIO_" + str(name).upper().replace("-", "_")]
        except KeyError:
            raise new_fatal(f"unknown scenario '{name}'", {"scenario": name}, code=CODE_CONFIG) from None

    @property
    def label(self) -> str:
        return self.name[len("SCENARIO_"):].lower().replace("_", "-")

    @property
    def stochastic(self) -> bool:
        return self == ScenarioEnum.SCENARIO_VALIDATE
