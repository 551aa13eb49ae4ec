from graph_matern.core.settings import Settings, settings

__all__ = ["Settings", "settings"]
