"""Integer codes shared by the simulation backends."""

SCHEME_CODES = {
    "ritcb": 0,
    "ritcb-ip": 1,
    "pracb": 2,
    "swa": 3,
    "knows": 4,
    "agile": 5,
}

OUT_DELIVERED = 0
OUT_INTERFERED = 1
OUT_NO_BOND = 2
OUT_GUARD = 3
