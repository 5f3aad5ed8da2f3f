"""Classical wave-particle analog of the Bohr atom in a weak uniform magnetic field."""
