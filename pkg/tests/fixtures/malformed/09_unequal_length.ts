@problemName Bad
@equalLength false
@classLabel true A B
@data
1,2,3:A
1,2:B
