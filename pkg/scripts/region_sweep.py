"""Mean harvested power of FAS, TFA and FPA versus region side A/lambda."""
from _common import sweep_main

if __name__ == "__main__":
    sweep_main("region", [1.0, 2.0, 3.0, 4.0], ["FAS", "TFA", "FPA"], __doc__)
