"""
joulebits - information-per-joule metrics on exactly solvable discrete systems.
"""
