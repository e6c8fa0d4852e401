%# This is a cut down version of the problem ChinaTown, useful for code examples and very slow unit tests
% The Train set is the same as ChinaTown, but the test set is reduced from 340 cases to 22 cases
%
@problemName UnitTest
@timeStamps false
@missing false
@univariate true
@equalLength true
@seriesLength 24
@classLabel true 1 2
@data
573.0,375.0,301.0,212.0,55.0,34.0,25.0,33.0,113.0,143.0,303.0,615.0,1226.0,1281.0,1221.0,1081.0,866.0,1096.0,1039.0,975.0,746.0,581.0,409.0,182.0:1
394.0,264.0,140.0,144.0,104.0,28.0,28.0,25.0,70.0,153.0,401.0,649.0,1216.0,1399.0,1249.0,1240.0,1109.0,1137.0,1290.0,1137.0,791.0,638.0,597.0,316.0:1
603.0,348.0,176.0,177.0,47.0,30.0,40.0,42.0,101.0,180.0,401.0,777.0,1344.0,1573.0,1408.0,1243.0,1141.0,1178.0,1256.0,1114.0,814.0,635.0,304.0,168.0:1
428.0,309.0,199.0,117.0,82.0,43.0,24.0,64.0,152.0,183.0,408.0,797.0,1288.0,1491.0,1523.0,1460.0,1365.0,1520.0,1700.0,1797.0,1596.0,1139.0,910.0,640.0:1
372.0,310.0,203.0,133.0,65.0,39.0,27.0,36.0,107.0,139.0,329.0,651.0,990.0,1027.0,1041.0,971.0,1104.0,844.0,1023.0,1019.0,862.0,643.0,591.0,452.0:1
448.0,344.0,183.0,146.0,71.0,14.0,30.0,41.0,108.0,137.0,277.0,576.0,1010.0,1271.0,1264.0,1062.0,1093.0,1030.0,1069.0,1151.0,898.0,754.0,467.0,362.0:1
