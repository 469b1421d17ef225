"""Connected components on a simulated CRCW PRAM with work/round accounting."""
