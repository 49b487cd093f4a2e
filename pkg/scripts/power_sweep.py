"""Mean harvested power versus transmit power P for all three schemes."""
from _common import sweep_main

if __name__ == "__main__":
    sweep_main("power", [10.0, 15.0, 20.0], ["FAS", "TFA", "FPA"], __doc__)
