"""Mean harvested power versus number of paths L at A = 3 lambda."""
from _common import sweep_main

if __name__ == "__main__":
    sweep_main("paths", [4, 14, 24], ["FAS", "TFA", "FPA"], __doc__, region_size=3.0)
