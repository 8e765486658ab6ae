def fmt(x, places=6):
    """Fixed-point text for a float, never printing a negative zero."""
    return f"{round(float(x), places) + 0.0:.{places}f}"
