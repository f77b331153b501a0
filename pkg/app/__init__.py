# Dispersive estimates for waves in the Friedlander model domain
