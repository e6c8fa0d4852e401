@problemName Bad
@univariate true
@classLabel true A B
1,2,3:A
