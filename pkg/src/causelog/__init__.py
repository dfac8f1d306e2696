"""causelog: counterfactual cause and suspect analysis over event logs."""
