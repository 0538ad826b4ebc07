"""Reference figures for visible-light links, kept for documentation and sanity checks.

None of these feed the simulation defaults except through the calibrated
channel parameters in :mod:`lifisim.channel`.
"""

VISIBLE_BAND_THZ = (400.0, 800.0)
# optical spectrum available vs. the whole RF spectrum; a size ratio, not a data rate
OPTICAL_TO_RF_BANDWIDTH_RATIO = 10_000

LIFI_TYPICAL_RATE_BPS = 1e9
LIFI_TYPICAL_COVERAGE_M = 10.0
CLAIMED_AUDIO_RANGE_M = (10.0, 15.0)

PAM8403_OUTPUT_W = 3.0
LED_MAX_SWITCHING_HZ = 1e6
