import hypothesis
import pytest

from combatsim.types import Catalog

from helpers import mk_type

hypothesis.settings.register_profile("dev", max_examples=100)
hypothesis.settings.register_profile(
    "acceptance", max_examples=1000, deadline=None
)
hypothesis.settings.load_profile("dev")


@pytest.fixture(scope="session")
def catalog() -> Catalog:
    """Small mixed catalog: ground/air weapons, flyers, buildings, workers."""
    return Catalog(
        name="test",
        types=(
            mk_type(0, "grunt", max_hp=40, mineral_cost=50,
                    weapon_damage_ground=6, cooldown_ground=15,
                    range_ground=120, top_speed=4.0),
            mk_type(1, "archer", max_hp=40, mineral_cost=25, gas_cost=25,
                    weapon_damage_ground=5, cooldown_ground=10,
                    weapon_damage_air=5, cooldown_air=10,
                    range_ground=128, range_air=128, top_speed=4.0),
            mk_type(2, "raptor", max_hp=60, mineral_cost=75, gas_cost=25,
                    weapon_damage_ground=8, cooldown_ground=10,
                    range_ground=96, top_speed=6.0, is_flyer=True),
            mk_type(3, "interceptor", max_hp=80, mineral_cost=100, gas_cost=50,
                    weapon_damage_air=12, cooldown_air=12,
                    range_air=128, top_speed=6.0, is_flyer=True),
            mk_type(4, "tank", max_hp=150, mineral_cost=150, gas_cost=100,
                    weapon_damage_ground=30, cooldown_ground=37,
                    range_ground=224, top_speed=4.0),
            mk_type(5, "pillbox", max_hp=200, mineral_cost=75,
                    weapon_damage_air=20, cooldown_air=15, range_air=224,
                    is_building=True, is_detector=True),
            mk_type(6, "hq", max_hp=1500, mineral_cost=400,
                    is_building=True, is_base=True),
            mk_type(7, "drone", max_hp=60, mineral_cost=50,
                    weapon_damage_ground=5, cooldown_ground=15,
                    range_ground=10, top_speed=5.0, is_worker=True),
            mk_type(8, "shieldling", max_hp=100, max_shield=60, mineral_cost=100,
                    weapon_damage_ground=16, cooldown_ground=22,
                    range_ground=15, top_speed=4.0),
        ),
    )
