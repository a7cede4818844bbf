from pydantic import BaseModel, ConfigDict, Field

from src.models.channel import ChannelModel


class ChannelConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    model: ChannelModel = ChannelModel.E1_IDEAL
    tx_power: float = Field(23.0, allow_inf_nan=False, description="dBm")
    carrier_freq: float = Field(5.9, gt=0, allow_inf_nan=False, description="GHz")
    # None: calibrated so that the zero-shadowing power received at prr_range equals noise
    noise_power: float | None = Field(None, allow_inf_nan=False, description="dBm")
    sinr_threshold: float = Field(2.0, allow_inf_nan=False, description="dB")
    range: float = Field(120.0, gt=0, allow_inf_nan=False, description="meters")
    # None: every other in-DOCA vehicle is an eligible receiver
    prr_range: float | None = Field(None, gt=0, allow_inf_nan=False, description="meters")
    shadow_sigma: float = Field(3.0, ge=0, allow_inf_nan=False, description="dB")
    decorrelation_distance: float = Field(25.0, gt=0, allow_inf_nan=False, description="meters")
    antenna_height: float = Field(1.5, gt=1.0, allow_inf_nan=False, description="meters")
    min_pathloss_distance: float = Field(3.0, gt=0, allow_inf_nan=False, description="meters")
